"""Models of betting and choosing when probabilities are only roughly known."""

__version__ = "0.1.0"
