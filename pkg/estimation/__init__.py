"""
Gözlemciler ve grup elemanı geri kazanımı
"""
