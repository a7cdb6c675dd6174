"""
服务模块包
包含调度模型、各类精确求解器、预言机、实例文档与基准工具
"""
