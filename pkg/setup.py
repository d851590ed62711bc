import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled kernels
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("RELPH_NO_EXTENSION"):
    ext_modules = cythonize(
        [Extension("relph._ckernels", ["src/relph/_ckernels.pyx"],
                   include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
