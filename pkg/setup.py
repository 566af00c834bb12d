import os

def read(fname:str) -> str:
    dir = os.path.dirname(__file__)

    return open(
        os.path.join(dir, fname),
        encoding='utf-8'
    ).read()

if __name__ == '__main__':
    from setuptools import setup, find_packages

    setup(
        name = "rdhhub",
        license = 'AGPL-3.0',
        description = "RDHHub is a reversible data hiding toolkit "
        "for 8-bit grayscale images, built on multiple predictors",
        long_description = read('README.md'),
        packages = find_packages(include=['rdhhub', 'rdhhub.*']),
        install_requires = [
            'numpy>=1.21.1',
            'pandas>=1.3.1',
            'python-dotenv>=0.19.0',
            'pydantic>=1.8.2,<2',
        ],
        entry_points = {
            'console_scripts': ['rdhhub = rdhhub.cli:main'],
        },
        version = '1.0.0',
    )
