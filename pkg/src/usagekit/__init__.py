"""usagekit: build usage models from screen recordings and generate UI tests from them."""

__version__ = "0.1.0"
