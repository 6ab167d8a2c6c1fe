import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back to NumPy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("cstar_comp._kernels", ["src/cstar_comp/_kernels.pyx"], include_dirs=[np.get_include()],
                   extra_compile_args=["-ftree-loop-vectorize", "-fvect-cost-model=dynamic"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
