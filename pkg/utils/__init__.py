#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
工具包：配置、日志与文件读写
"""

from .config import Settings, settings, get_settings
from .logger import setup_logger

__all__ = [
    'Settings',
    'settings',
    'get_settings',
    'setup_logger',
]
