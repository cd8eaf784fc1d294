from setuptools import setup

setup(
    name='nlse-gauge',
    version='0.1.0',
    description='Nonlinear gauge transformations of Schrodinger equations: '
                'group algebra, invariant classification and a 1-D '
                'spectral solver',
    py_modules=['cli', 'config', 'dynamics', 'errors', 'gauge_algebra',
                'lazy', 'schema', 'timefn', 'timing', 'utils',
                'wavefield'],
    python_requires='>=3.8',
    install_requires=['jsonschema', 'numpy', 'numexpr', 'pandas'],
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['nlse-gauge = cli:main']},
)
