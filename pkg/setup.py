"""Builds the optional compiled tape kernel; the package works without it."""

from setuptools import setup

ext_modules = []
try:
    import numpy  # noqa: F401
    from Cython.Build import cythonize

    ext_modules = cythonize(["src/batchfhe/sim/_kernels.pyx"], compiler_directives={"language_level": 3}, quiet=True)
except Exception as exc:  # no Cython: fall back to the numpy kernel at import
    print(f"warning: compiled kernel not built ({exc}); using the numpy fallback")

setup(ext_modules=ext_modules)
