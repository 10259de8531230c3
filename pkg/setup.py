try:
    from setuptools import setup
except:
    from distutils.core import setup

config = {
    'description': 'Dyadinc, exact δ-discretized incidence geometry at dyadic scales',
    'author': 'Dyadinc contributors',
    'version': '0.1.0',
    'install_requires': [
        'nose>=1.3.7',
        'schematics>=2.1.0',
        'numpy>=1.17',
        'pyyaml>=5.1'
    ],
    'tests_require': [
        'nose>=1.3.7'
    ],
    'packages': [
        'dyadinc',
        'dyadinc.entities',
        'dyadinc.cli'
    ],
    'entry_points': {
        'console_scripts': ['dyadinc=dyadinc.cli:main']
    },
    'scripts': [],
    'name': 'dyadinc'
}

setup(**config)
