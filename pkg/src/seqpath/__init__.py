"""Sequential equilibria of extensive-form games by homotopy path following."""
