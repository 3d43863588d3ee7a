"""Build script: compiles the optional kernel extension when Cython and a C++
toolchain are present, otherwise installs pure-Python only (the package
selects the fallback at import time)."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("indepax._kernel._core",
                   ["src/indepax/_kernel/_core.pyx"],
                   language="c++",
                   extra_compile_args=["-O2"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
