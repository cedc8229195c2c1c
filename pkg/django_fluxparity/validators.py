from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible
from django.utils.translation import gettext_lazy as _


@deconstructible
class PositiveValidator:
    message = _('Ensure this value is greater than zero.')
    code = 'not_positive'

    def __init__(self, message=None, code=None, allow_zero=False):
        if message is not None:
            self.message = message
        if code is not None:
            self.code = code
        self.allow_zero = allow_zero
        if allow_zero and message is None:
            self.message = _('Ensure this value is not negative.')

    def __call__(self, value):
        if value is None:
            return
        if value < 0.0 or (value == 0.0 and not self.allow_zero):
            raise ValidationError(self.message, code=self.code, params={'value': value})

    def __eq__(self, other):
        return (
            isinstance(other, PositiveValidator) and
            (self.message == other.message) and
            (self.code == other.code) and
            (self.allow_zero == other.allow_zero)
        )


@deconstructible
class OpenIntervalValidator:
    """
    Accept lower < value < upper, or lower < value <= upper when
    `include_upper` is set.
    """
    message = _('Ensure this value lies between %(lower)s and %(upper)s.')
    code = 'out_of_range'

    def __init__(self, lower, upper, include_upper=False, message=None, code=None):
        self.lower = lower
        self.upper = upper
        self.include_upper = include_upper
        if message is not None:
            self.message = message
        if code is not None:
            self.code = code

    def __call__(self, value):
        if value is None:
            return
        above_upper = value > self.upper if self.include_upper else value >= self.upper
        if value <= self.lower or above_upper:
            raise ValidationError(
                self.message,
                code=self.code,
                params={'lower': self.lower, 'upper': self.upper, 'value': value},
            )

    def __eq__(self, other):
        return (
            isinstance(other, OpenIntervalValidator) and
            (self.lower, self.upper, self.include_upper) == (other.lower, other.upper, other.include_upper) and
            (self.message == other.message) and
            (self.code == other.code)
        )


validate_positive = PositiveValidator()
validate_non_negative = PositiveValidator(allow_zero=True)
validate_bloch_angle = OpenIntervalValidator(
    0.0, 1.0, message=_('Bloch angles are given in units of π within (0, 1).'),
)
