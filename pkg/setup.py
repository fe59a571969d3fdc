import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("GBP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "gbp._kernels._speedups",
                    ["src/gbp/_kernels/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install with the pure NumPy kernels only.
        ext_modules = []

setup(ext_modules=ext_modules)
