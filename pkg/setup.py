"""Build the compiled RK4 kernel; the package still works without it."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DKPEIG_NO_EXTENSION", "") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "dkpeig._kernels._rk4",
                    ["src/dkpeig/_kernels/_rk4.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
