"""Value Substitution Calculus workbench."""
