"""Build script for the optional compiled aggregation kernel.

The package works without the extension: dispca._kernels falls back to the
numpy implementation when the compiled module is absent.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    np = None
    cythonize = None

if cythonize is not None:
    ext = Extension(
        "dispca._kernels._aggregate",
        sources=["src/dispca/_kernels/_aggregate.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext.optional = True  # build failure degrades to the pure backend
    ext_modules = cythonize([ext], language_level="3")
else:
    ext_modules = []

setup(ext_modules=ext_modules)
