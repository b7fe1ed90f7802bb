from setuptools import setup, find_packages
import unittest
import codecs

def test_suite():
    test_loader = unittest.TestLoader()
    test_suite = test_loader.discover('milo_trees/tests', pattern='test_*.py')

    return test_suite


setup(
    name='milo-trees',
    version='0.1.0',
    description='Optimal Binary Classification Trees by Mixed-Integer Linear Optimization',
    long_description=(codecs.open("README.md", encoding='utf-8').read() +
                      "\n\n" + codecs.open("CHANGELOG.md", encoding='utf-8').read()),
    long_description_content_type="text/markdown",
    license='MIT',
    test_suite='setup.test_suite',
    classifiers=[
    'Intended Audience :: Science/Research',
    'Topic :: Scientific/Engineering :: Artificial Intelligence',
    'Topic :: Scientific/Engineering :: Mathematics',
    'License :: OSI Approved :: MIT License',
    'Programming Language :: Python :: 3',
    ],
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.21',
        'pandas>=1.5',
        'scipy>=1.9',
        'highspy>=1.5',
        'PyYAML>=5.1',
    ],
    tests_require=['mock'],
    extras_require={
        'plot': ['matplotlib>=3.3'],
        'test': ['mock'],
    },
    packages=find_packages(),
    entry_points={
        'console_scripts': ['milo-trees=milo_trees.milo_trees:main'],
    },
    include_package_data=True
)
