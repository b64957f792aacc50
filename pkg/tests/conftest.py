import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from predclass.datasets import demo_extended_test, demo_test, demo_train


@pytest.fixture
def demo():
    train, labels = demo_train()
    return train, labels, demo_test()


@pytest.fixture
def demo_extended():
    train, labels = demo_train()
    test, test_labels = demo_extended_test()
    return train, labels, test, test_labels
