from __future__ import annotations

import logging
import threading
import time
from pathlib import Path

import requests
from django.conf import settings

from lexicon.types import Caption, CaptionSource
from websource.backends import ManifestBackend
from websource.exceptions import (
    CaptionServiceError,
    CaptionServiceNotConfiguredError,
    MissingCaptionError,
)
from websource.types import WebRecord


logger = logging.getLogger(__name__)


class CaptionProvider:
    """Same image_ref, same caption, for the life of the provider"""

    def caption(self, rec: WebRecord) -> Caption:
        raise NotImplementedError


class ManifestCaptionProvider(CaptionProvider):
    """Lookup-table captioner reading the manifest caption column"""

    def __init__(self, captions: dict[str, str]):
        self._captions = dict(captions)

    @classmethod
    def from_backend(cls, backend: ManifestBackend) -> ManifestCaptionProvider:
        return cls(backend.captions)

    def caption(self, rec: WebRecord) -> Caption:
        try:
            text = self._captions[rec.source_id]
        except KeyError:
            raise MissingCaptionError(f'no caption for record `{rec.source_id}`')
        return Caption(text, CaptionSource.PROVIDER)


class HttpCaptionProvider(CaptionProvider):
    """
    Client for an external captioning service: POSTs the raw image bytes
    and reads a plain-text caption back. Failed attempts are retried with
    exponential backoff; answers are cached per image_ref.
    """

    def __init__(self, base_url: str, auth_header: str = 'Authorization',
                 auth_token: str = '', timeout: float = 30.0,
                 retries: int = 3, backoff: float = 0.5,
                 session: requests.Session | None = None):
        if not base_url:
            raise CaptionServiceNotConfiguredError('caption service URL is not configured')
        self.base_url = base_url
        self.timeout = timeout
        self.retries = max(1, retries)
        self.backoff = backoff
        self._session = session or requests.Session()
        self._headers = {'Content-Type': 'application/octet-stream'}
        if auth_token:
            self._headers[auth_header] = auth_token
        self._cache: dict[str, str] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_settings(cls, **kwargs) -> HttpCaptionProvider:
        conf = settings.CURATOR
        return cls(
            base_url=conf['CAPTION_SERVICE_URL'],
            auth_header=conf['CAPTION_SERVICE_AUTH_HEADER'],
            auth_token=conf['CAPTION_SERVICE_AUTH_TOKEN'],
            timeout=conf['CAPTION_SERVICE_TIMEOUT'],
            retries=conf['CAPTION_SERVICE_RETRIES'],
            backoff=conf['CAPTION_SERVICE_BACKOFF'],
            **kwargs,
        )

    def caption(self, rec: WebRecord) -> Caption:
        with self._lock:
            cached = self._cache.get(rec.image_ref)
        if cached is None:
            text = self._request(rec)
            with self._lock:
                cached = self._cache.setdefault(rec.image_ref, text)
        return Caption(cached, CaptionSource.PROVIDER)

    def _image_bytes(self, rec: WebRecord) -> bytes:
        if rec.image_ref.startswith(('http://', 'https://')):
            response = self._session.get(rec.image_ref, timeout=self.timeout)
            response.raise_for_status()
            return response.content
        try:
            return Path(rec.image_ref).read_bytes()
        except OSError as e:
            raise CaptionServiceError(f'cannot read image {rec.image_ref}: {e}') from e

    def _request(self, rec: WebRecord) -> str:
        last_error = None
        for attempt in range(self.retries):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    self.base_url,
                    data=self._image_bytes(rec),
                    headers=self._headers,
                    timeout=self.timeout,
                )
                response.raise_for_status()
                return response.text.strip()
            except requests.RequestException as e:
                last_error = e
                logger.warning('caption request for %s failed (attempt %d of %d): %s',
                               rec.source_id, attempt + 1, self.retries, e)
        raise CaptionServiceError(
            f'caption service failed for `{rec.source_id}` after '
            f'{self.retries} attempts: {last_error}'
        )


def caption_of(provider: CaptionProvider, rec: WebRecord) -> Caption:
    return provider.caption(rec)
