"""
Файловый кэш факторов матрицы Грама (.npz).

Ключ - SHA-256 канонического JSON заголовка (потенциал, область, m, q, n,
квадратура, блочность). Заголовок хранится в файле и сверяется при чтении.
"""

import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from src.config.kernel_config import ACTIVE_CONFIG

logger = logging.getLogger(__name__)

HEADER_KEY = '__header__'


def _json_default(obj: Any):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def canonical_header(header: Dict[str, Any]) -> str:
    return json.dumps(header, sort_keys=True, separators=(',', ':'), default=_json_default, ensure_ascii=False)


def header_key(header: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_header(header).encode('utf-8')).hexdigest()


def default_cache_dir(config=None) -> str:
    """Каталог кэша: переменная окружения (в том числе из .env) или значение по умолчанию"""
    load_dotenv()
    cfg = (config or ACTIVE_CONFIG).get_config('CACHE_CONFIG')
    return os.getenv(cfg['env_var']) or cfg['default_dir']


class GramCache:
    """
    Кэш с одним писателем: запись берет файл блокировки <key>.lock
    (O_CREAT | O_EXCL), чтение никогда не блокируется.
    """

    def __init__(self, directory: Optional[str] = None):
        """
        Args:
            directory: Каталог кэша (по умолчанию из BERGMAN_CACHE_DIR)
        """
        self.directory = directory or default_cache_dir()

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, f"{key}.npz")

    def load(self, header: Dict[str, Any]) -> Optional[Dict[str, np.ndarray]]:
        """
        Загружает полезную нагрузку по заголовку.

        Returns:
            Словарь массивов или None (нет записи либо заголовок не совпал)
        """
        key = header_key(header)
        path = self._path(key)
        if not os.path.exists(path):
            return None
        try:
            with np.load(path, allow_pickle=False) as data:
                payload = {name: data[name] for name in data.files}
        except (OSError, ValueError) as e:
            logger.warning("gram_cache_unreadable key=%s error=%s", key[:12], e)
            return None
        stored = str(payload.pop(HEADER_KEY, np.array([''])).ravel()[0])
        if stored != canonical_header(header):
            logger.warning("gram_cache_header_mismatch key=%s", key[:12])
            self._remove(path)
            return None
        return payload

    def store(self, header: Dict[str, Any], payload: Dict[str, np.ndarray]) -> bool:
        """
        Сохраняет запись. Если файл блокировки занят другим писателем, запись пропускается.

        Returns:
            True, если файл записан
        """
        os.makedirs(self.directory, exist_ok=True)
        key = header_key(header)
        lock = os.path.join(self.directory, f"{key}.lock")
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            logger.info("gram_cache_locked key=%s", key[:12])
            return False
        try:
            tmp = os.path.join(self.directory, f"{key}.tmp.npz")
            np.savez(tmp, **{HEADER_KEY: np.array([canonical_header(header)])}, **payload)
            os.replace(tmp, self._path(key))
            logger.debug("gram_cache_store key=%s", key[:12])
            return True
        finally:
            os.close(fd)
            self._remove(lock)

    def inspect(self) -> List[Dict[str, Any]]:
        """Список записей: ключ, размер, q, n, m из заголовка"""
        if not os.path.isdir(self.directory):
            return []
        entries = []
        for name in sorted(os.listdir(self.directory)):
            if not name.endswith('.npz') or name.endswith('.tmp.npz'):
                continue
            path = os.path.join(self.directory, name)
            entry: Dict[str, Any] = {'key': name[:-4], 'bytes': os.path.getsize(path)}
            try:
                with np.load(path, allow_pickle=False) as data:
                    header = json.loads(str(data[HEADER_KEY].ravel()[0]))
                entry.update({k: header.get(k) for k in ('q', 'n', 'm')})
                entry['valid'] = header_key(header) == entry['key']
            except (OSError, ValueError, KeyError):
                entry['valid'] = False
            entries.append(entry)
        return entries

    def clear(self) -> int:
        """Удаляет все записи; возвращает их число"""
        if not os.path.isdir(self.directory):
            return 0
        removed = 0
        for name in os.listdir(self.directory):
            if name.endswith('.npz'):
                self._remove(os.path.join(self.directory, name))
                removed += 1
        logger.info("gram_cache_cleared entries=%d", removed)
        return removed

    @staticmethod
    def _remove(path: str):
        try:
            os.remove(path)
        except FileNotFoundError:
            pass
