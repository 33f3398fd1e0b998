def pytest_addoption(parser):
    parser.addoption("--nmating-cli", action="store", default=None,
                     help="path to the nmating command line binary")
