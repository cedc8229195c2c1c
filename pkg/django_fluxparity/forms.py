from django import forms
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from . import validators
from .fields import AngularFrequencyField, PhaseField, PositiveFloatField
from .rwa import PROCESSES
from .settings import fluxparity_settings as settings

ENGINE_ANALYTIC = 'analytic'
ENGINE_ORACLE = 'oracle'
ENGINES = (ENGINE_ANALYTIC, ENGINE_ORACLE)

FORMAT_CSV = 'csv'
FORMAT_JSON = 'json'


def _choices(values):
    return [(value, value) for value in values]


class QubitForm(forms.Form):
    gap_hz = AngularFrequencyField()
    bias_hz = AngularFrequencyField(allow_negative=True)


class ResonatorForm(forms.Form):
    frequency_hz = AngularFrequencyField()
    kappa_x_hz = AngularFrequencyField()
    kappa_i_hz = AngularFrequencyField()
    n_max = forms.IntegerField(min_value=1)


class CouplingForm(forms.Form):
    g_t_hz = AngularFrequencyField(allow_zero=True)
    g_l_hz = AngularFrequencyField(allow_zero=True)


class DecoherenceForm(forms.Form):
    t1_s = PositiveFloatField()
    t2_s = PositiveFloatField()

    def clean(self):
        cleaned_data = super().clean()
        t1, t2 = cleaned_data.get('t1_s'), cleaned_data.get('t2_s')
        if t1 is not None and t2 is not None and t2 > 2.0 * t1:
            raise ValidationError(_('T2 cannot exceed 2·T1.'), code='t2_too_long')
        return cleaned_data


class DriveForm(forms.Form):
    amplitude_hz = AngularFrequencyField(allow_zero=True)
    phase_rad = PhaseField()
    imbalance_db = forms.FloatField()
    leakage_db = forms.FloatField(required=False)
    temperature_k = forms.FloatField(validators=[validators.validate_non_negative])
    thermal_model = forms.ChoiceField(choices=_choices(('population', 'amplitude')))


class SweepAxisForm(forms.Form):
    start = forms.FloatField()
    stop = forms.FloatField()
    points = forms.IntegerField(min_value=2)

    def clean(self):
        cleaned_data = super().clean()
        if cleaned_data.get('start') is not None and cleaned_data.get('start') == cleaned_data.get('stop'):
            raise ValidationError(_('Axis start and stop must differ.'), code='empty_axis')
        return cleaned_data


class ThetaAxisForm(SweepAxisForm):
    start = forms.FloatField(validators=[validators.validate_bloch_angle])
    stop = forms.FloatField(validators=[validators.validate_bloch_angle])


class SpectrumForm(forms.Form):
    kind = forms.ChoiceField(choices=_choices(PROCESSES))
    linewidth_prefactor = PositiveFloatField()
    multiplier = PositiveFloatField(required=False)
    oracle_points = forms.IntegerField(min_value=0)


class PropagationForm(forms.Form):
    steps_per_period = forms.IntegerField(required=False)

    def clean_steps_per_period(self):
        steps = self.cleaned_data['steps_per_period']
        if steps is not None and steps < settings.STEPS_PER_PERIOD:
            raise ValidationError(
                _('At least %(minimum)s steps per period are needed for a stable step.'),
                code='too_coarse',
                params={'minimum': settings.STEPS_PER_PERIOD},
            )
        return steps


class OutputForm(forms.Form):
    directory = forms.CharField(required=False)
    name = forms.CharField()
    format = forms.ChoiceField(choices=_choices((FORMAT_CSV, FORMAT_JSON)))


class EngineForm(forms.Form):
    engine = forms.ChoiceField(choices=_choices(ENGINES))
