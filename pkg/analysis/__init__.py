"""
Lie grubu aritmetiği, daldırma ve Riccati/Gramian hesapları
"""
