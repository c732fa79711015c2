import os

from setuptools import setup

ext_modules = []
if not os.environ.get("AFFCORR_NO_EXT"):
    try:
        import numpy  # noqa: F401
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "affcorr._ckernels",
                    ["src/affcorr/_ckernels.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
