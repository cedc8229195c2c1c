from django import forms
from django.utils.translation import gettext_lazy as _

from . import validators
from .util import hz_to_angular, wrap_phase

__all__ = [
    'AngularFrequencyField',
    'PhaseField',
    'PositiveFloatField',
]


class PositiveFloatField(forms.FloatField):
    default_validators = [validators.validate_positive]


class AngularFrequencyField(forms.FloatField):
    """
    Takes a frequency in Hz and cleans to an angular frequency in rad/s.
    Validators see the value in Hz.
    """
    default_error_messages = {
        'invalid': _('Enter a frequency in Hz.'),
    }

    def __init__(self, *args, allow_negative=False, allow_zero=False, **kwargs):
        super().__init__(*args, **kwargs)
        if not allow_negative:
            validator = validators.validate_non_negative if allow_zero else validators.validate_positive
            self.validators.append(validator)

    def clean(self, value):
        value = super().clean(value)
        return None if value is None else hz_to_angular(value)


class PhaseField(forms.FloatField):
    """
    Relative antenna phase in radians, wrapped onto [0, 2π).
    """
    def clean(self, value):
        value = super().clean(value)
        return None if value is None else wrap_phase(value)
