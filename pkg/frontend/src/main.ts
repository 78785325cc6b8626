import 'bpmn-js/dist/assets/diagram-js.css';
import 'bpmn-js/dist/assets/bpmn-js.css';
import 'bpmn-js/dist/assets/bpmn-font/css/bpmn-embedded.css';
import './style.css';

import { ApiClient } from './api';
import { App } from './app';

const root = document.querySelector<HTMLElement>('#app');
if (!root) throw new Error('missing #app mount point');

// same-origin in production; the dev server proxies /api to the service
const app = new App(root, new ApiClient(''));
void app.start();
