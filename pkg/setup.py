import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ULAB_NO_EXT", "0") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "uncertlab._kernels",
                    ["src/uncertlab/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # no Cython available: pure-numpy backend is selected at import time
        ext_modules = []

setup(ext_modules=ext_modules)
