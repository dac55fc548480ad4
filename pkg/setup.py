import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FEDSKETCH_SKIP_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("fedsketch._fwht", ["src/fedsketch/_fwht.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
