#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
文件工具模块

本模块负责命令行涉及的全部文件读写：
1. 权重/测度 JSON 文档的读取（出错时报告 路径:行:列）
2. GridFunction CSV 的读写（首行为盒子 a1,b1,a2,b2，其后每行一个 x 切片）
3. 报告 JSON 与序列 CSV 的异步写出

设计特点：
- 所有格式错误统一抛出 InputFormatError，便于 CLI 映射为退出码 1
- 写出使用 aiofiles，导出阶段在事件循环中执行
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import aiofiles
import numpy as np

from weights import (
    GridFunction,
    MeasureSpec,
    WeightSpec,
    WeightSpecError,
    measure_from_dict,
    weight_from_dict,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class InputFormatError(ValueError):
    """
    输入文件格式错误

    Attributes:
        path: 文件路径
        line / column: 出错位置（从 1 开始；未知时为 None）
    """

    def __init__(self, path: PathLike, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.path = str(path)
        self.line = line
        self.column = column
        location = self.path
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        super().__init__(f"{location}: {message}")


def _read_text(path: PathLike) -> str:
    file_path = Path(path)
    if not file_path.exists():
        raise InputFormatError(path, "文件不存在")
    try:
        return file_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputFormatError(path, f"无法读取文件: {e}") from e


def load_json(path: PathLike) -> Any:
    """读取 JSON 文档，语法错误携带行列号"""
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(path, e.msg, e.lineno, e.colno) from e


def load_weight(path: PathLike) -> WeightSpec:
    doc = load_json(path)
    try:
        return weight_from_dict(doc)
    except WeightSpecError as e:
        raise InputFormatError(path, str(e)) from e


def load_measure(path: PathLike) -> MeasureSpec:
    """读取测度文档；权重文档按 power = 1 的密度处理"""
    doc = load_json(path)
    try:
        return measure_from_dict(doc)
    except WeightSpecError as e:
        raise InputFormatError(path, str(e)) from e


def _parse_row(path: PathLike, row: List[str], line: int) -> List[float]:
    values = []
    column = 1
    for cell in row:
        try:
            values.append(float(cell))
        except ValueError:
            raise InputFormatError(path, f"不是数值: {cell!r}", line, column)
        column += len(cell) + 1
    return values


def read_grid_csv(path: PathLike) -> GridFunction:
    """
    读取网格函数 CSV

    格式：
        a1,b1,a2,b2
        v[0,0],v[0,1],...
        v[1,0],...
    """
    text = _read_text(path)
    rows = [(i + 1, row) for i, row in enumerate(csv.reader(io.StringIO(text))) if row]
    if len(rows) < 2:
        raise InputFormatError(path, "需要盒子行和至少一行数值", len(rows) + 1, 1)

    box_line, box_row = rows[0]
    box = _parse_row(path, box_row, box_line)
    if len(box) != 4:
        raise InputFormatError(path, f"盒子行需要 4 个数，实际 {len(box)}", box_line, 1)

    values = []
    width = None
    for line, row in rows[1:]:
        parsed = _parse_row(path, row, line)
        if width is None:
            width = len(parsed)
        elif len(parsed) != width:
            raise InputFormatError(path, f"列数 {len(parsed)} 与首行 {width} 不一致", line, 1)
        values.append(parsed)

    try:
        return GridFunction(tuple(box), np.asarray(values, dtype=float))
    except WeightSpecError as e:
        raise InputFormatError(path, str(e)) from e


def grid_to_csv(grid: GridFunction) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([repr(b) for b in grid.box])
    for row in grid.values:
        writer.writerow([repr(float(v)) for v in row])
    return buffer.getvalue()


def series_to_csv(series: Sequence[Dict[str, Any]]) -> str:
    """序列（字典列表）转 CSV，列顺序取首次出现顺序"""
    columns: List[str] = []
    for record in series:
        for key in record:
            if key not in columns:
                columns.append(key)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for record in series:
        writer.writerow({k: _csv_cell(record.get(k)) for k in columns})
    return buffer.getvalue()


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_csv_cell(v) for v in value)
    return str(value)


async def write_text(path: Optional[PathLike], text: str) -> Optional[str]:
    """
    写出文本；path 为 None 时返回文本本身（由调用方写到 stdout）

    Returns:
        写入文件时返回绝对路径，否则返回 None
    """
    if path is None:
        return None
    file_path = Path(path).resolve()
    file_path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(file_path, "w", encoding="utf-8") as f:
        await f.write(text)
    logger.info(f"已写出: {file_path} ({len(text)} 字符)")
    return str(file_path)


async def write_grid_csv(path: PathLike, grid: GridFunction) -> Optional[str]:
    return await write_text(path, grid_to_csv(grid))


async def write_series_csv(path: PathLike, series: Iterable[Dict[str, Any]]) -> Optional[str]:
    return await write_text(path, series_to_csv(list(series)))
