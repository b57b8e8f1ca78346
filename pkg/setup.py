"""Builds the optional compiled kernels; the package works without them."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("NASHFLOW_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("nashflow._ckernels", ["src/nashflow/_ckernels.pyx"])],
            language_level="3",
        )

setup(ext_modules=ext_modules)
