"""Build script for the optional compiled kernels.

The package works without the extension; ``flockball._backend`` falls back to
the NumPy implementation when ``flockball._ckernels`` cannot be imported.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "flockball._ckernels",
                ["src/flockball/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
