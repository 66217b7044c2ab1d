import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PERCHOPT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "perchopt._kernels",
                    ["src/perchopt/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no FMA contraction: keeps arithmetic kernels bitwise equal to the numpy fallback
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
