"""
测试公共配置
测试期间不写日志文件，hypothesis 取消单例超时
"""

import os

os.environ.setdefault("SCHED_LOG_DIR", "")
os.environ.setdefault("SCHED_LOG_LEVEL", "WARNING")

import pytest  # noqa: E402
from hypothesis import HealthCheck, settings  # noqa: E402

from services.core import SUM_WC, Instance  # noqa: E402
from tests.strategies import make_jobs  # noqa: E402

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def partition_112():
    """X = {1,1,2} 的 ΣwC / ΣC 构造"""
    return Instance(
        make_jobs(1, (1, 1, None), (1, 1, None), (2, 2, None)),
        make_jobs(2, (1, 1, None)),
        SUM_WC, SUM_WC, 13, 3,
    )
