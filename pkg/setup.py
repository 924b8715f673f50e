import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("BLOCKMARK_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # fallback kernels are used at import time
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "blockmark.kernels._ckernels",
                    ["src/blockmark/kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no -ffast-math: results must match the numpy fallback bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
