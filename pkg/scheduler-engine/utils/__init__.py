"""
工具模块包
包含日志、并行扫描等工具功能
"""
