from django.core.files.base import ContentFile
from django.core.files.storage import FileSystemStorage

from django_fluxparity.settings import fluxparity_settings as settings


class ResultStorage(FileSystemStorage):
    """
    Result files under RESULTS_PATH. Saving to an existing name replaces
    the file, so identical runs leave identical trees.
    """
    def __init__(self, location=None, *args, **kwargs):
        location = location or settings.RESULTS_PATH

        super().__init__(location, *args, **kwargs)

    def get_available_name(self, name, max_length=None):
        if self.exists(name):
            self.delete(name)
        return name

    def write_text(self, name: str, text: str) -> str:
        return self.save(name, ContentFile(text.encode('utf-8')))


def get_result_storage(location: str = None) -> ResultStorage:
    return settings.RESULT_STORAGE_CLASS(location=location or None)
