"""
PyPI pip package following the material by Stephen Hudson found here:
https://betterscientificsoftware.github.io/python-for-hpc/tutorials/python-pypi-packaging/
"""

from setuptools import setup, find_packages

setup(
    name='slexp',
    version='v0.1.1',
    description='Expansion experiments for SL_d over residue rings of ' \
        + 'number fields.',
    long_description='slexp computes Cayley graph spectra, exact random ' \
        + 'walk flattening, escape of mass from subgroups, product set ' \
        + 'growth and ping-pong freeness certificates for SL_d over ' \
        + 'O_K/(q), where O_K = Z[x]/(f) is a monogenic order. \n\n' \
        + 'Every quantity is computed exactly where it can be and ' \
        + 'numerically with explicit tolerances otherwise.',
    keywords=['expander graphs','group theory','random walks'],
    license='MIT',
    packages=find_packages(exclude=['tests']),
    install_requires=['joblib',
                      'numpy',
                      'pandas>=1.5',
                      'scipy',
                      'sympy',
                      'mpmath',
                      ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
        },
    entry_points={
        'console_scripts': ['slexp=slexp.cli:main'],
        },

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.8',
)
