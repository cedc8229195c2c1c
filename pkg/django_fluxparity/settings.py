import os

from django.conf import settings
from django.test.signals import setting_changed
from django.utils.module_loading import import_string

USER_SETTINGS = getattr(settings, 'DJANGO_FLUXPARITY', None)

DEFAULTS = {
    # Worker count is the only value taken from the environment
    'WORKERS': os.environ.get('FLUXPARITY_WORKERS', 1),
    'RESULTS_PATH': 'results',
    'RESULT_STORAGE_CLASS': 'django_fluxparity.storage.ResultStorage',
    # Operating point and sample parameters (lab units, converted at the boundary)
    'QUBIT_GAP_HZ': 8.2e9,
    'QUBIT_BIAS_HZ': 0.0,
    'RESONATOR_FREQUENCY_HZ': 3.88e9,
    'KAPPA_X_HZ': 2.43e6,
    'KAPPA_I_HZ': 70e3,
    'COUPLING_T_HZ': 40e6,
    'COUPLING_L_HZ': 0.0,
    'T1_S': 2.6e-6,
    'T2_S': 0.1e-6,
    'EFFECTIVE_TEMPERATURE_K': 0.125,
    'DRIVE_AMPLITUDE_HZ': 10e6,
    'IMBALANCE_DB': 0.0,
    'LEAKAGE_DB': None,
    'READOUT_PHOTONS': 33,
    # Calibration conversions
    'READOUT_PHOTONS_PER_MW': 331.0,
    'DRIVE_PHOTONS_PER_MW': 0.16,
    # Hilbert space truncation
    'N_MAX': 8,
    'SIDEBAND_PHOTONS': 2,
    # Numerics
    'COMMUTATOR_TOLERANCE': 1e-12,
    'STEPS_PER_PERIOD': 50,
    'STEADY_WINDOW': 0.2,
    'CONVERGENCE_THRESHOLD': 1e-3,
    'TRACE_TOLERANCE': 1e-6,
    'STEP_HALVINGS': 3,
    'TRUNCATION_TOLERANCE': 1e-3,
    'BESSEL_DOMAIN': 12.0,
    # Spectrum maps
    'LINEWIDTH_PREFACTOR': 1.0,
    'PROCESS_DRIVE_MULTIPLIERS': {
        'one_photon': 1.0,
        'two_photon': 10.0,
        'red_sideband': 10.0,
        'blue_sideband': 10.0,
        'blue_two_photon': 10.0,
    },
}

IMPORT_STRINGS = (
    'RESULT_STORAGE_CLASS',
)


def import_from_string(val, setting_name):
    """
    Attempt to import a class from a string representation.
    """
    try:
        return import_string(val)
    except ImportError as e:
        msg = "Could not import '%s' for DJANGO_FLUXPARITY setting '%s'. %s: %s." % (
            val, setting_name, e.__class__.__name__, e)
        raise ImportError(msg)


def perform_import(val, setting_name):
    """
    If the given setting is a string import notation,
    then perform the necessary import or imports.
    """
    if val is None:
        return None
    elif isinstance(val, str):
        return import_from_string(val, setting_name)
    elif isinstance(val, (list, tuple)):
        return [import_from_string(item, setting_name) for item in val]
    return val


class FluxParitySettings:
    """
    Application settings namespaced under DJANGO_FLUXPARITY, accessed as
    properties:

        from django_fluxparity.settings import fluxparity_settings
        print(fluxparity_settings.QUBIT_GAP_HZ)

    Any setting listed in IMPORT_STRINGS is resolved to the object it names.
    """
    def __init__(self, user_settings=None, defaults=None, import_strings=None):
        if user_settings:
            self._user_settings = user_settings
        self.defaults = defaults or DEFAULTS
        self.import_strings = import_strings or IMPORT_STRINGS
        self._cached_attrs = set()

    @property
    def user_settings(self):
        if not hasattr(self, '_user_settings'):
            self._user_settings = getattr(settings, 'DJANGO_FLUXPARITY', {})
        return self._user_settings

    def __getattr__(self, attr):
        if attr not in self.defaults:
            raise AttributeError("Invalid application setting: '%s'" % attr)

        try:
            val = self.user_settings[attr]
        except KeyError:
            val = self.defaults[attr]

        if attr in self.import_strings:
            val = perform_import(val, attr)
        elif attr == 'WORKERS':
            val = int(val)

        self._cached_attrs.add(attr)
        setattr(self, attr, val)
        return val

    def reload(self):
        for attr in self._cached_attrs:
            delattr(self, attr)
        self._cached_attrs.clear()
        if hasattr(self, '_user_settings'):
            delattr(self, '_user_settings')


fluxparity_settings = FluxParitySettings(USER_SETTINGS, DEFAULTS, IMPORT_STRINGS)


# -----------------------------------------------------------------------------
def reload_settings(*args, **kwargs):  # pragma: no cover
    setting = kwargs['setting']

    if setting == 'DJANGO_FLUXPARITY':
        fluxparity_settings.reload()


setting_changed.connect(reload_settings)
