# sl-solvability package
