"""HTTP service exposing the solver and training runners."""
