"""Internal and absolute Hochschild cohomology of finite difference algebras."""

__version__ = "0.1.0"
