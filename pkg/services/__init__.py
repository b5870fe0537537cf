#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
服务层：命令执行服务与命令流水线
"""

from .command_service import CommandInputs, CommandOutcome, CommandService, CommandError, load_inputs

__all__ = [
    'CommandInputs',
    'CommandOutcome',
    'CommandService',
    'CommandError',
    'load_inputs',
]
