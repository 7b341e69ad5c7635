"""Build the optional Cython kernels; the package runs without them."""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("RAILEVAC_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "railevac._ckernels",
                    ["src/railevac/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
            compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
