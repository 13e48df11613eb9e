"""
Senaryolar, ölçüm üretimi ve uçtan uca koşular
"""
