# Green kernel, its action and operator-norm estimates
