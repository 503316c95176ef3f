# Solvability criteria, model reduction and the verdict pipeline
