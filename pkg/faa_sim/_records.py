# -*- coding: utf-8 -*-

import csv
import io
import numbers
from typing import Any, Optional, Iterable, Iterator, Sequence, Tuple

import numpy as np
import tablib

from .base import ConfigError

# 17位有效数字, 解析后与原值逐位一致
FLOAT_FORMAT = '{:.16e}'


def format_value(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return FLOAT_FORMAT.format(float(value))
    return value


class Record(object):
    """A row of an emitted table."""
    __slots__ = ('_keys', '_values')

    def __init__(self, keys: Sequence[str], values: Sequence[Any]):
        self._keys = tuple(keys)
        self._values = tuple(values)

        # Ensure that lengths match properly.
        assert len(self._keys) == len(self._values)

    def keys(self) -> Tuple[str, ...]:
        return self._keys

    def values(self) -> Tuple[Any, ...]:
        return self._values

    def __repr__(self):
        return '<Record {}>'.format(dict(zip(self._keys, self._values)))

    def __getitem__(self, key):
        if isinstance(key, int):
            return self._values[key]
        if key in self._keys:
            return self._values[self._keys.index(key)]
        raise KeyError("Record contains no '{}' field.".format(key))


class RecordCollection(list):
    """Rows sharing one header, exported through Tablib."""

    def __init__(self, records: Iterable[Record] = (), headers: Optional[Sequence[str]] = None,
                 line_numbers: Optional[Sequence[int]] = None):
        super().__init__(records)
        self.headers = tuple(headers) if headers is not None else (tuple(self[0].keys()) if self else ())
        self.line_numbers = tuple(line_numbers) if line_numbers is not None else tuple(range(2, len(self) + 2))

    @classmethod
    def from_rows(cls, headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> 'RecordCollection':
        return cls((Record(headers, row) for row in rows), headers)

    @classmethod
    def from_csv(cls, text: str, required: Sequence[str] = (), source: str = '<csv>',
                 exact: bool = False) -> 'RecordCollection':
        # 表头必需; 出错时报告行号. 读入用csv模块逐行解析, tablib不提供行号
        reader = csv.reader(io.StringIO(text))
        try:
            headers = next(reader)
        except StopIteration:
            raise ConfigError('{}: empty file, header row required'.format(source))
        except csv.Error as e:
            raise ConfigError('{}: line 1: {}'.format(source, e))
        headers = [h.strip() for h in headers]
        missing = [h for h in required if h not in headers]
        if missing:
            raise ConfigError('{}: line 1: header missing columns {}'.format(source, ', '.join(missing)))
        if exact and tuple(headers) != tuple(required):
            raise ConfigError('{}: line 1: expected header {}, got {}'.format(
                source, ','.join(required), ','.join(headers)))
        records, line_numbers = [], []
        try:
            for row in reader:
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != len(headers):
                    raise ConfigError('{}: line {}: expected {} fields, got {}'.format(
                        source, reader.line_num, len(headers), len(row)))
                records.append(Record(headers, [cell.strip() for cell in row]))
                line_numbers.append(reader.line_num)
        except csv.Error as e:
            raise ConfigError('{}: line {}: {}'.format(source, reader.line_num, e))
        return cls(records, headers, line_numbers)

    def numbered(self) -> Iterator[Tuple[int, Record]]:
        return zip(self.line_numbers, self)

    @property
    def dataset(self) -> tablib.Dataset:
        data = tablib.Dataset()
        data.headers = list(self.headers)
        for record in self:
            data.append([format_value(v) for v in record.values()])
        return data

    def export(self, format: str, **kwargs) -> str:
        return self.dataset.export(format, **kwargs)
