#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日志配置模块

本模块提供统一的日志配置功能，主要特性：
1. 同时输出到控制台和文件
2. 文件日志按大小自动轮转
3. 文件日志使用 JSON 格式，便于批量实验后检索边界告警

库模块只通过 logging.getLogger(__name__) 取得记录器，处理器由命令行入口统一安装。

典型用法：
    >>> logger = setup_logger("pfw", "INFO", "logs/pfw.log")
    >>> logger.warning("boundary hit", extra={"condition": "alpha-line"})
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Optional

try:
    from pythonjsonlogger.json import JsonFormatter
except ImportError:  # python-json-logger < 3
    from pythonjsonlogger.jsonlogger import JsonFormatter


def setup_logger(
    name: str,
    level: str = "INFO",
    log_file: Optional[str] = None,
    max_bytes: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
    json_format: bool = False
) -> logging.Logger:
    """
    设置并配置一个日志记录器

    Args:
        name: 日志记录器名称；传入 "" 表示根记录器，使所有模块的日志统一输出
        level: 日志级别（DEBUG、INFO、WARNING、ERROR、CRITICAL）
        log_file: 日志文件路径（可选），不指定则只输出到控制台
        max_bytes: 单个日志文件的最大字节数
        backup_count: 保留的轮转备份数量
        json_format: 控制台是否也使用 JSON 格式

    Returns:
        logging.Logger: 配置好的日志记录器

    Note:
        - 控制台输出到 stderr，stdout 留给 JSON 报告
        - 多次调用会清除之前的处理器，避免重复输出
    """
    logger = logging.getLogger(name)

    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(numeric_level)

    logger.handlers.clear()

    # ========== 创建日志格式化器 ==========
    json_formatter = JsonFormatter(
        '%(asctime)s %(name)s %(levelname)s %(filename)s %(lineno)d %(message)s'
    )
    simple_formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(name)s - %(message)s'
    )

    # ========== 控制台处理器 ==========
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(json_formatter if json_format else simple_formatter)
    logger.addHandler(console_handler)

    # ========== 文件处理器（可选）==========
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(json_formatter)
        logger.addHandler(file_handler)

    return logger
