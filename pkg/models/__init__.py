#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
数据模型包
"""

from .report_models import (
    Witness,
    Verdict,
    RegimeReport,
    CharacteristicKind,
    RectangleModel,
    CharacteristicReport,
    ReverseDoublingReport,
    EquivalenceReport,
    TestingReport,
    MaximalReport,
    ExponentFit,
    OneTailedPowerReport,
    SimpleExampleReport,
    HalfExampleReport,
    OutputFormat,
    RunConfig,
    RunReport,
)

__all__ = [
    'Witness',
    'Verdict',
    'RegimeReport',
    'CharacteristicKind',
    'RectangleModel',
    'CharacteristicReport',
    'ReverseDoublingReport',
    'EquivalenceReport',
    'TestingReport',
    'MaximalReport',
    'ExponentFit',
    'OneTailedPowerReport',
    'SimpleExampleReport',
    'HalfExampleReport',
    'OutputFormat',
    'RunConfig',
    'RunReport',
]
