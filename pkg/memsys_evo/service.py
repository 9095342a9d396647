from memsys_evo.errors import CommunicationError
from memsys_evo.estimator import DEFAULT_TIMEOUT, make_request, parse_response

import logging
import threading

import requests


logger = logging.getLogger(__name__)


class EstimatorService:
    def __init__(self, catalog, url, timeout=DEFAULT_TIMEOUT):
        """
        Create a new EstimatorService object representing a remote PPA
        estimation service.

        Note that this does not connect to the service, that is done
        as batches are submitted. So it will not raise even if the
        given service does not exist or you have no network connection.

        Each batch is POSTed to the URL as a JSON request object of the
        estimator line protocol, and the service must answer with the
        matching JSON response object.

        Args:
            catalog (Catalog): Supplies the objective names.
            url (str): The endpoint of the service. May be prepended
                by 'http://' or 'https://', with https the default if a
                bare hostname is given.
            timeout (float): Seconds to wait for each response.
        """
        if not url.startswith('http://') and not url.startswith('https://'):
            url = 'https://{}'.format(url)
        self.catalog = catalog
        self.timeout = timeout
        self._url = url
        self._lock = threading.Lock()
        self._next_batch = 0
        self._session = requests.Session()

    def estimate(self, comp, items):
        """
        Estimates a batch of parameterizations of one compiler.

        Args:
            comp (CompilerSpec): The compiler of every item.
            items ([Tuple[MemoryRequirement, dict]]): Memories and codes.

        Returns:
            np.ndarray: Objective values, shape (items, objectives).

        Raises:
            CommunicationError: There was a problem communicating with
                the service. Is it running?
            ProtocolError: The service answered with something that is
                not a response for this batch.
        """
        with self._lock:
            batch_id = self._next_batch
            self._next_batch += 1
        request = make_request(batch_id, comp, self.catalog.objectives, items)
        try:
            r = self._session.post(self._url, json=request,
                                   timeout=self.timeout)
        except requests.RequestException as e:
            raise CommunicationError('Batch {}: {}'.format(batch_id, e))
        if r.status_code != 200:
            raise CommunicationError('Batch {}: service answered {}'.format(
                batch_id, r.status_code))
        try:
            response = r.json()
        except ValueError as e:
            raise CommunicationError('Batch {}: response is not JSON: {}'
                                     .format(batch_id, e))
        logger.debug('Batch %d: %d items for %s', batch_id, len(items),
                     comp.name)
        return parse_response(batch_id, len(items),
                              len(self.catalog.objectives), response)

    def close(self):
        self._session.close()
