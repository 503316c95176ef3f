# Numerical helpers, trend policy and output writers
