import os

from setuptools import Extension, setup

# The compiled step kernel is optional: set CPRSV_NO_EXT=1 to skip it, or let
# the import-time fallback in cprsv._backend pick the pure-numpy path when the
# extension is absent.
ext_modules = []
if os.environ.get("CPRSV_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cprsv._kernels",
                    ["src/cprsv/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
