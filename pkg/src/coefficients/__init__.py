# Coefficient pairs, densities and regime classification
