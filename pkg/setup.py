"""Build the optional Cython kernels; the package falls back to pure Python without them."""

import os

from setuptools import setup


def extensions():
    if os.environ.get("DPMIX_NO_EXT"):
        return []
    try:
        import numpy  # noqa: F401
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "dpmix._sweep",
        ["src/dpmix/_sweep.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
