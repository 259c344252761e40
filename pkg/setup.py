import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ASQP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("asqp._native", ["src/asqp/_native.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Pure-Python fallback covers everything; the extension is an optimization.
        ext_modules = []

setup(ext_modules=ext_modules)
