import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("GSMALLEABLE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = cythonize(
            [Extension("gsmalleable._kernels", ["src/gsmalleable/_kernels.pyx"])],
            compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=extensions)
