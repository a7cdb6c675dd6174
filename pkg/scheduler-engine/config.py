"""
配置管理模块
统一管理求解器、枚举预言机与日志的配置参数
"""

import os

from dotenv import load_dotenv

load_dotenv()


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    """应用配置类"""

    # 日志配置
    LOG_LEVEL: str = os.getenv("SCHED_LOG_LEVEL", "INFO")
    LOG_DIR: str = os.getenv("SCHED_LOG_DIR", "logs")

    # 并行配置（默认单线程）
    THREADS: int = int(os.getenv("SCHED_THREADS", "1"))

    # 暴力枚举预言机预算
    ORACLE_MAX_JOBS: int = int(os.getenv("SCHED_ORACLE_MAX_JOBS", "8"))
    ORACLE_MAX_CONFIGURATIONS: int = int(os.getenv("SCHED_ORACLE_MAX_CONFIGURATIONS", "20000000"))

    # 求解器返回的见证调度是否自检
    VERIFY_WITNESS: bool = _env_flag("SCHED_VERIFY_WITNESS", "true")

    @classmethod
    def get_logging_config(cls) -> dict:
        """获取日志配置"""
        return {
            "level": cls.LOG_LEVEL.upper(),
            "log_dir": cls.LOG_DIR,
        }

    @classmethod
    def get_oracle_config(cls) -> dict:
        """获取预言机预算配置"""
        return {
            "max_total_jobs": cls.ORACLE_MAX_JOBS,
            "max_configurations": cls.ORACLE_MAX_CONFIGURATIONS,
        }

    @classmethod
    def get_solver_config(cls) -> dict:
        """获取求解器配置"""
        return {
            "threads": max(1, cls.THREADS),
            "verify_witness": cls.VERIFY_WITNESS,
        }


# 全局配置实例
config = Config()
