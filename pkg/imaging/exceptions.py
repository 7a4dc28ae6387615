from webwilss.exceptions import DataError


class ImagingError(DataError):
    pass


class UnreadableImageError(ImagingError):
    pass


class UnsupportedFormatError(ImagingError):
    pass


class MalformedHeaderError(ImagingError):
    pass


class UnsupportedBitDepthError(ImagingError):
    pass


class InvalidGridError(ImagingError):
    pass
