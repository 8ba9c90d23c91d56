"""
Запись результатов исследований: CSV через pandas и JSON-сводки.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.config.kernel_config import ACTIVE_CONFIG

logger = logging.getLogger(__name__)


def _json_default(obj: Any):
    if isinstance(obj, complex):
        return {'re': obj.real, 'im': obj.imag}
    if isinstance(obj, np.generic):
        return _json_default(obj.item()) if isinstance(obj.item(), complex) else obj.item()
    if isinstance(obj, np.ndarray):
        return [_json_default(v) if isinstance(v, complex) else v for v in obj.tolist()]
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


class StudyStorage:
    """
    Каталог вывода одного запуска.

    Строки CSV пишутся в заданном порядке, числа - с float_digits значащими цифрами.
    """

    def __init__(self, out_dir: str = "out", fmt: str = "both", config=None):
        """
        Args:
            out_dir: Каталог вывода
            fmt: 'csv', 'json' или 'both'
            config: Класс конфигурации (по умолчанию ACTIVE_CONFIG)
        """
        if fmt not in ('csv', 'json', 'both'):
            raise ValueError(f"неизвестный формат {fmt}")
        self.out_dir = out_dir
        self.fmt = fmt
        cfg = (config or ACTIVE_CONFIG).get_config('OUTPUT_CONFIG')
        self.float_format = f"%.{cfg['float_digits']}g"
        self.schema_version = cfg['schema_version']
        self.written: List[str] = []

    @property
    def wants_csv(self) -> bool:
        return self.fmt in ('csv', 'both')

    @property
    def wants_json(self) -> bool:
        return self.fmt in ('json', 'both')

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_table(self, name: str, rows: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> Optional[str]:
        """
        Сохраняет таблицу <name>.csv (если формат включает csv).

        Комплексные значения раскладываются в столбцы <col>_re и <col>_im.
        """
        if not self.wants_csv:
            return None
        df = pd.DataFrame(rows, columns=columns)
        for col in list(df.columns):
            if df[col].map(lambda v: isinstance(v, complex)).any():
                pos = df.columns.get_loc(col)
                values = df.pop(col).map(complex)
                df.insert(pos, f"{col}_re", values.map(lambda v: v.real))
                df.insert(pos + 1, f"{col}_im", values.map(lambda v: v.imag))
        os.makedirs(self.out_dir, exist_ok=True)
        path = self.path(f"{name}.csv")
        df.to_csv(path, index=False, float_format=self.float_format, encoding='utf-8', lineterminator='\n')
        self.written.append(path)
        logger.info("table_written path=%s rows=%d", path, len(df))
        return path

    def write_json(self, name: str, data: Dict[str, Any], force: bool = False) -> Optional[str]:
        """
        Сохраняет сводку <name>.json со schema_version.

        Args:
            force: Писать даже при формате csv (служебные файлы)
        """
        if not (self.wants_json or force):
            return None
        os.makedirs(self.out_dir, exist_ok=True)
        path = self.path(f"{name}.json")
        body = {'schema_version': self.schema_version, **data}
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(body, f, indent=4, ensure_ascii=False, default=_json_default)
            f.write('\n')
        self.written.append(path)
        logger.info("json_written path=%s", path)
        return path

    def read_table(self, name: str) -> pd.DataFrame:
        return pd.read_csv(self.path(f"{name}.csv"))

    def read_json(self, name: str) -> Dict[str, Any]:
        with open(self.path(f"{name}.json"), 'r', encoding='utf-8') as f:
            return json.load(f)
