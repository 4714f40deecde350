from setuptools import setup, find_packages

# read the contents of your README file
# cf https://packaging.python.org/en/latest/guides/making-a-pypi-friendly-readme/
from pathlib import Path
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text()

setup(
    name='permclt',
    version='0.1.0',
    description="Joint distribution of descent number and major index on conjugacy classes, and its central limit theorem",
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    entry_points={
        'console_scripts': [
            'permclt = permclt.bin.permclt:main'
        ]
    },
    install_requires = [
        'mpmath',
        'numpy>=1.20',
        'scipy',
    ],
    extras_require={
        'dev': [
            'mypy'
        ]
    },
    test_suite='tests',
)
